# Spectral geometry package
