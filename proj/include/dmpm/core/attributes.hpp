#pragma once

// Inline every call inside the annotated kernel. The dual-number operators
// are small but numerous; GCC otherwise leaves many of them out of line.
#if defined(__GNUC__)
#define DMPM_FLATTEN __attribute__((flatten))
#else
#define DMPM_FLATTEN
#endif
