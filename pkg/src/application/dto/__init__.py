# application.dto package
