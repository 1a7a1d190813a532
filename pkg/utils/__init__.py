# Shared exceptions, rational validators, settings access and test builders
