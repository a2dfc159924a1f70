# application.orchestrators package
