# Measures package
