# domain.exceptions package
