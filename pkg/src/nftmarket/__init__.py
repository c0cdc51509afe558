"""Offline NFT marketplace stack.

Subpackages/modules: chain (ledger + marketplace contract), wallet (keys and
connect flow), content_store (CID-addressed objects), genart (image
providers), node/service/client (the dApp backend and its clients), perf
(latency bench), cli.
"""

__version__ = "0.1.0"
