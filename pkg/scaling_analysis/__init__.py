# Scaling analysis package
