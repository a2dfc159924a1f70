class DomainException(Exception):
    """Excepción base del dominio"""
    pass

class EntityValidationException(DomainException):
    """Excepción para validaciones de entidades"""
    pass

class ValueObjectValidationException(DomainException):
    """Excepción para validaciones de value objects"""
    pass

class OutOfRangeException(DomainException):
    """Tiempo o vencimiento fuera del dominio de la grilla/horizonte"""
    pass

class AdmissibilityException(DomainException):
    """Parámetros afines o cargas del compensador no admisibles"""
    pass

class NumericalSchemeException(DomainException):
    """Violación de la política de pasos o de supuestos del esquema numérico"""
    pass

class UnderpoweredTestException(DomainException):
    """Prueba Monte Carlo con muy pocas trayectorias"""
    pass
