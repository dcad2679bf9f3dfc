#ifndef OPMS_ALLOCATOR_H_
#define OPMS_ALLOCATOR_H_

namespace opms {

// Keeps freed batch-scoring buffers in the heap instead of returning them to
// the OS after every chunk. No-op outside glibc. Call once from main().
void configure_allocator();

}  // namespace opms

#endif  // OPMS_ALLOCATOR_H_
