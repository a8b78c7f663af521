"""Two-center Coulomb plus harmonic oscillator eigensolver in prolate spheroidal coordinates."""
