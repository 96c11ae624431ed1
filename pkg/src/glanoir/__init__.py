"""glanoir: taxonomy-routed bibliographic search with harvestable and
gleanable metadata surfaces (OAI-PMH client, COinS, Dublin Core, BibTeX, RIS)."""

__version__ = "0.1.0"
