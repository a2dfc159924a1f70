# application.processors.scenario package
