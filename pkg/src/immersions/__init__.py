"""Immersions of transitive tournaments and complete digraphs in tournaments."""
