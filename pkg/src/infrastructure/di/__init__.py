# infrastructure.di package
