# Path and contour geometry package
