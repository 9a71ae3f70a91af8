#!/usr/bin/env python3
"""Regenerates the .hex wire fixtures in this directory.

Deliberately independent of the C++ codec: every byte is packed here with
struct so the fixtures act as a second implementation of the wire layout.
If the library and this script disagree, one of them is wrong — do not
"fix" a fixture by pasting in library output.
"""

import struct
from pathlib import Path

HERE = Path(__file__).resolve().parent


def u8(v): return struct.pack("<B", v)
def u16(v): return struct.pack("<H", v)
def u32(v): return struct.pack("<I", v)
def i32(v): return struct.pack("<i", v)
def i64(v): return struct.pack("<q", v)
def f64(v): return struct.pack("<d", v)


def ua_string(s):
    if s is None:
        return i32(-1)
    b = s.encode("utf-8")
    return i32(len(b)) + b


def ua_bytes(b):
    if b is None:
        return i32(-1)
    return i32(len(b)) + b


def nodeid_numeric(ns, ident):
    if ns == 0 and ident <= 0xFF:
        return u8(0x00) + u8(ident)
    if ns <= 0xFF and ident <= 0xFFFF:
        return u8(0x01) + u8(ns) + u16(ident)
    return u8(0x02) + u16(ns) + u32(ident)


def localized_text(locale, text):
    mask = (0x01 if locale is not None else 0) | (0x02 if text is not None else 0)
    out = u8(mask)
    if locale is not None:
        out += ua_string(locale)
    if text is not None:
        out += ua_string(text)
    return out


def extension_object_empty():
    return nodeid_numeric(0, 0) + u8(0)


def response_header(timestamp, handle, result):
    return (i64(timestamp) + u32(handle) + u32(result)
            + u8(0)            # empty DiagnosticInfo
            + i32(0)           # string table
            + extension_object_empty())


def app_description(app_uri, product_uri, name, app_type, discovery_urls):
    out = ua_string(app_uri) + ua_string(product_uri)
    out += localized_text(None, name)
    out += u32(app_type)
    out += ua_string(None)  # gateway server uri
    out += ua_string(None)  # discovery profile uri
    out += i32(len(discovery_urls))
    for url in discovery_urls:
        out += ua_string(url)
    return out


def user_token_policy(policy_id, token_type, sec_policy_uri):
    return (ua_string(policy_id) + u32(token_type)
            + ua_string(None) + ua_string(None) + ua_string(sec_policy_uri))


def endpoint(url, app, cert, mode, policy_uri, tokens, level):
    out = ua_string(url) + app + ua_bytes(cert) + u32(mode) + ua_string(policy_uri)
    out += i32(len(tokens))
    for t in tokens:
        out += t
    out += ua_string("http://opcfoundation.org/UA-Profile/Transport/uatcp-uasc-uabinary")
    out += u8(level)
    return out


def frame(kind, chunk, payload):
    return kind + chunk + u32(8 + len(payload)) + payload


def msg_frame(channel, token, seq, reqid, body):
    payload = u32(channel) + u32(token) + u32(seq) + u32(reqid) + body
    return frame(b"MSG", b"F", payload)


def write_fixture(name, data, comment):
    lines = [f"# {comment}"]
    hexstr = data.hex()
    for i in range(0, len(hexstr), 64):
        lines.append(hexstr[i:i + 64])
    (HERE / name).write_text("\n".join(lines) + "\n")


POLICY_NONE = "http://opcfoundation.org/UA/SecurityPolicy#None"
POLICY_B256SHA256 = "http://opcfoundation.org/UA/SecurityPolicy#Basic256Sha256"


def main():
    # Hello frame: version 0, 64 KiB buffers, 16 MiB message cap, 4096 chunks.
    hello = (u32(0) + u32(65536) + u32(65536) + u32(16777216) + u32(4096)
             + ua_string("opc.tcp://plc.example:4840"))
    write_fixture("hello.hex", frame(b"HEL", b"F", hello),
                  "HEL frame, version 0, 64KiB buffers, url opc.tcp://plc.example:4840")

    # Error frame: security checks failed.
    err = u32(0x80130000) + ua_string("sec")
    write_fixture("error.hex", frame(b"ERR", b"F", err),
                  "ERR frame, Bad_SecurityChecksFailed, reason \"sec\"")

    # GetEndpointsResponse with two endpoints inside a MSG frame.
    ep1 = endpoint(
        "opc.tcp://plc.example:4840",
        app_description("urn:plc", "urn:acme", "PLC", 0, []),
        None, 1, POLICY_NONE,
        [user_token_policy("anon", 0, None)],
        0)
    ep2 = endpoint(
        "opc.tcp://plc.example:4840",
        app_description("urn:plc", "urn:acme", "PLC", 0, ["opc.tcp://plc.example:4840"]),
        bytes([0x01, 0x02, 0x03]), 3, POLICY_B256SHA256,
        [user_token_policy("user0", 1, POLICY_B256SHA256),
         user_token_policy("cert0", 2, None)],
        110)
    body = (nodeid_numeric(0, 431)
            + response_header(0x0123456789ABCDEF, 3, 0)
            + i32(2) + ep1 + ep2)
    write_fixture("get_endpoints_response.hex", msg_frame(5, 7, 42, 3, body),
                  "MSG frame: GetEndpointsResponse, 2 endpoints (None+anon, "
                  "SignAndEncrypt+Basic256Sha256)")

    # ReadResponse carrying one Byte DataValue and one String array.
    dv1 = u8(0x03) + u8(0x03) + u8(0x05) + u32(0)  # value+status, Byte 5, Good
    arr = u8(0x80 | 0x0C) + i32(2) + ua_string("a") + ua_string("bc")
    dv2 = u8(0x01) + arr
    body = (nodeid_numeric(0, 634)
            + response_header(0x0123456789ABCDEF, 9, 0)
            + i32(2) + dv1 + dv2
            + i32(0))
    write_fixture("read_response.hex", msg_frame(5, 7, 43, 4, body),
                  "MSG frame: ReadResponse, Byte 5 (Good) + String array [a, bc]")


if __name__ == "__main__":
    main()
