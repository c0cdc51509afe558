import pytest

from nftmarket import wallet
from nftmarket.chain import Chain
from nftmarket.clock import FixedClock
from nftmarket.content_store import ContentStore, MetadataDocument


@pytest.fixture
def clock():
    return FixedClock(1_700_000_000)


@pytest.fixture
def store():
    return ContentStore()


@pytest.fixture
def chain(store, clock):
    return Chain(store, clock=clock)


@pytest.fixture
def alice():
    return wallet.generate_keypair(b"\x01" * 32)


@pytest.fixture
def bob():
    return wallet.generate_keypair(b"\x02" * 32)


@pytest.fixture
def metadata_cid(store):
    doc = MetadataDocument("piece", "a test piece", 50, "cid:none")
    return store.pin_json(doc)
