# presentation.console package
