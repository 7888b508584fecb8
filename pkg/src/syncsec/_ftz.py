"""Flush-to-zero control for the trellis kernels.

The alignment trellises keep probability mass normalized to the largest
cell; faraway cells fade smoothly into the subnormal range where x86
arithmetic falls back to microcode (observed ~60x slowdown). Setting the
MXCSR FTZ/DAZ bits flushes those cells to exact zero, which is also the
pruning behaviour the kernels assume.

The flag is per-thread, so worker threads enable it on first use (see
util.parallel_map). On non-x86 targets the intrinsic is skipped and the
kernels stay correct, just slower.
"""

import platform

from numba import njit, types

_IS_X86 = platform.machine() in ("x86_64", "AMD64", "i686", "i386")

if _IS_X86:
    import llvmlite.ir as lir
    from numba.core import cgutils
    from numba.extending import intrinsic

    @intrinsic
    def _set_ftz_daz(typingctx):
        sig = types.void()

        def codegen(context, builder, signature, args):
            i32 = lir.IntType(32)
            ptr = cgutils.alloca_once(builder, i32)
            p8 = builder.bitcast(ptr, lir.IntType(8).as_pointer())
            fnty = lir.FunctionType(lir.VoidType(), [lir.IntType(8).as_pointer()])
            stmxcsr = builder.module.declare_intrinsic("llvm.x86.sse.stmxcsr", fnty=fnty)
            ldmxcsr = builder.module.declare_intrinsic("llvm.x86.sse.ldmxcsr", fnty=fnty)
            builder.call(stmxcsr, [p8])
            val = builder.or_(builder.load(ptr), lir.Constant(i32, 0x8040))  # FTZ | DAZ
            builder.store(val, ptr)
            builder.call(ldmxcsr, [p8])
            return context.get_dummy_value()

        return sig, codegen

    @njit(cache=False)
    def _enable_ftz_jit():
        _set_ftz_daz()

    def enable_ftz():
        """Enable FTZ/DAZ on the calling thread. Idempotent, cheap."""
        _enable_ftz_jit()

else:  # pragma: no cover - non-x86 fallback

    def enable_ftz():
        return
