# Mappers de escenario por comando
