# domain.value_objects package
