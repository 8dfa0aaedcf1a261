"""sari-sim: a deterministic, headless convenience-store simulator.

An API-controlled avatar walks a small grocery store, grabs annotated
products, and checks them out at a self-service counter with a barcode
scanner, all over a WebSocket JSON protocol.  A task benchmark with
10 Hz episode logging, exact replay verification, and a scripted agent
client round out the package.
"""

__version__ = "0.1.0"
