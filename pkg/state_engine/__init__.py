# State engine package
