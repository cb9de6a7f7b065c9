"""Dead-code detection, localization, and repair pipeline.

Submodules:
    code_model     line parsing, kinds, deletion and mask transforms
    pattern_forge  adversarial always-false pattern catalog and insertion
    oracle         conservative unused/naive-unreachable analyzer
    classifiers    pivot classifier contract and implementations
    attribution    leave-one-out/mask attribution and soft thresholding
    llm            prompt building, chat transports, verdict parsing
    audit          line diff and patch auditing
    harness        dataset synthesis, pipeline driver, metrics
    cli            the `dce` command
"""

__version__ = "0.1.0"
