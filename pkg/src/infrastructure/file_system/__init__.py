# infrastructure.file_system package
