"""trafficmarl: multi-agent actor-critic traffic signal control.

Subpackages:
    netcore     from-scratch feed-forward network engine
    trafficenv  mesoscopic queue-based traffic simulator + matrix games
    marl        learning algorithms and baselines
    harness     experiment orchestration, CSV metrics, CLI
"""

__version__ = "0.1.0"
