"""Story benchmark toolchain for nested-belief reasoning.

Generate object-finding stories with provable belief-query answers, score
model responses with rule-based rewards (as a library, CLI, or HTTP
service), search for adversarially hard stories, and run evaluation,
judging, and knowledge-transfer experiments against chat endpoints.
"""

__version__ = "0.1.0"
