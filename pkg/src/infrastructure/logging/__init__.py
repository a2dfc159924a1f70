# infrastructure.logging package
