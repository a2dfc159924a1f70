# Exportadores de resultados (csv, json, xlsx)
