# application.processors package
