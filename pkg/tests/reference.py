"""Brute-force reference interpreter for the marketplace semantics.

Deliberately primitive: plain dicts, no signatures, no blocks, no queues.
Used as the independent oracle for randomized mint/buy/faucet sequences.
"""

from __future__ import annotations


class RefState:
    def __init__(self):
        self.balances: dict[str, int] = {}
        self.nonces: dict[str, int] = {}
        self.issuance = 0
        # token_id -> [owner, creator, uri, price, listed]
        self.tokens: dict[int, list] = {}
        self.sold_counts: dict[int, int] = {}

    def faucet(self, addr: str, amount: int) -> str:
        if amount <= 0:
            return "ValidationError"
        self.balances[addr] = self.balances.get(addr, 0) + amount
        self.issuance += amount
        return "Success"

    def mint(self, sender: str, uri_known: bool, uri_is_metadata: bool, price: int) -> str:
        if sender not in self.balances:
            return "UnknownSender"
        if price == 0:
            return "ZeroPrice"
        if not uri_known:
            return "UnknownUri"
        if not uri_is_metadata:
            return "MetadataInvalid"
        token_id = len(self.tokens) + 1
        self.tokens[token_id] = [sender, sender, None, price, True]
        self.nonces[sender] = self.nonces.get(sender, 0) + 1
        return "Success"

    def buy(self, sender: str, token_id: int, payment: int) -> str:
        if sender not in self.balances:
            return "UnknownSender"
        t = self.tokens.get(token_id)
        if t is None:
            return "UnknownToken"
        owner, creator, uri, price, listed = t
        if not listed:
            return "NotListed"
        if sender == owner:
            return "SelfPurchase"
        if payment != price:
            return "WrongPayment"
        if self.balances.get(sender, 0) < payment:
            return "InsufficientFunds"
        self.balances[sender] -= payment
        self.balances[owner] = self.balances.get(owner, 0) + payment
        t[0] = sender
        t[4] = False
        self.sold_counts[token_id] = self.sold_counts.get(token_id, 0) + 1
        self.nonces[sender] = self.nonces.get(sender, 0) + 1
        return "Success"

    def owner_of(self, token_id: int):
        t = self.tokens.get(token_id)
        return None if t is None else t[0]

    def listed_ids(self) -> list[int]:
        return sorted(i for i, t in self.tokens.items() if t[4])
