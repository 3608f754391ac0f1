"""
Centered p-moments on discrete probability spaces and matrix algebras, with
defect checks for Leibniz-type inequalities and a counterexample search.
"""

__version__ = "1.0.0"
