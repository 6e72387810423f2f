# Power-set package
