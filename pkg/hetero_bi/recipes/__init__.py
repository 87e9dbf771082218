# Experiment recipes built on the engine.
