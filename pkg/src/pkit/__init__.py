"""Toolkit for Priestley and Esakia spaces presented over products of omega+1."""
