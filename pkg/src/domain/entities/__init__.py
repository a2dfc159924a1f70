# domain.entities package
