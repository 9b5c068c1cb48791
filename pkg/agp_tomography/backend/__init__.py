# Geminal-matrix backends: exact statevector and sampled readouts
