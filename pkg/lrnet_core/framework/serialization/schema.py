# Checkpoint container layout (all integers little-endian):
#
#   magic            4 bytes  b"LRNC"
#   version          u32
#   config_len       u32, then config_len bytes of canonical JSON (RunConfig)
#   tensor_count     u32, then per tensor:
#       name_len     u32, then name_len bytes of UTF-8 name
#       rank         u32
#       dims         rank x u64
#       payload      prod(dims) x f32
#   state_len        u32, then state_len bytes of canonical JSON (counters, optimizer, early stop)
FORMAT_MAGIC = b"LRNC"
FORMAT_VERSION = 1

OPTIM_M_PREFIX = "optim.m."
OPTIM_V_PREFIX = "optim.v."


def optim_m_name(param: str) -> str:
    return f"{OPTIM_M_PREFIX}{param}"


def optim_v_name(param: str) -> str:
    return f"{OPTIM_V_PREFIX}{param}"
