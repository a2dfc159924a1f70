# infrastructure.config package
