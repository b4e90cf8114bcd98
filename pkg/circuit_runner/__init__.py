# Circuit runner package
