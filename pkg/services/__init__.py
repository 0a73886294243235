"""Finite-dimensional fixed-point constructions for amenable semigroup actions."""
