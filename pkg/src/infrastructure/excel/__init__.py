# infrastructure.excel package
