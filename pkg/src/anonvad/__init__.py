"""Privacy-preserving video anomaly detection toolkit.

Trains an adversarial frame anonymizer whose utility branch enforces
temporally-distinct clip features, extracts anonymized features for
weakly-supervised anomaly detection, and evaluates the resulting
utility/privacy trade-off.
"""

__version__ = "0.1.0"
