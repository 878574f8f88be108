"""
Handshake over a socket pair
============================

Two sessions talk through the length-prefixed wire format.  The derived
key is SHA-256 over the shared element, so both sides print the same
fingerprint.
"""

import socket
import threading

from sdkex.protocol import (
    Message,
    Role,
    SocketTransport,
    generate_params,
    run_handshake,
    session_create,
)

ps = generate_params("nilpotent", 1, toy=True)
left, right = socket.socketpair()
keys = {}


def responder():
    state = session_create(ps, Role.RESPONDER)
    keys["responder"] = run_handshake(SocketTransport(right, 5.0), state)


th = threading.Thread(target=responder)
th.start()
keys["initiator"] = run_handshake(SocketTransport(left, 5.0), session_create(ps, Role.INITIATOR))
th.join()
for who, key in keys.items():
    print(f"{who:>9}: {key.hex()[:32]}")

###############################################################################
# What a single message looks like on the wire.
from sdkex.golden import golden_message

raw = golden_message("modp").to_bytes()
print("bytes:", raw.hex())
print("parsed:", Message.from_bytes(raw))
