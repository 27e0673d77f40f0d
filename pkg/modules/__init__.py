# RIS Few-Bit Channel Estimation Modules
