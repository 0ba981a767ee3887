"""Dehn twist automorphisms of free groups and their centralisers."""
