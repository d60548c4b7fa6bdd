from cohere.commutator.clients.calculator import *  # noqa: F403
