"""gradescent: exact graded-field algebra, graded valuations, monomial
integral closure and birational-descent verification, with a CLI front end."""

__version__ = "0.1.0"
