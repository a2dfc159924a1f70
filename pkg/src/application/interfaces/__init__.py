# application.interfaces package
