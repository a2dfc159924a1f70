# application.services package
