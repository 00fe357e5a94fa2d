#pragma once

#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "casa/resolve.hpp"
#include "casa/values.hpp"

namespace casa {

// Length-prefixed object-graph wire format used for cross-node transfer:
// a class table, then one record per node with field values; references are
// node indices in discovery order, so identical graphs encode to identical
// bytes regardless of heap layout.
namespace wire {

enum : std::uint8_t {
  kTagUnit = 0,
  kTagNull = 1,
  kTagInt = 2,
  kTagBool = 3,
  kTagStr = 4,
  kTagRef = 5,
  kTagActor = 6,
};

struct WireError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void putU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void putU64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

struct Reader {
  const std::uint8_t* p;
  const std::uint8_t* end;
  std::uint8_t u8() {
    if (p >= end) throw WireError("truncated record");
    return *p++;
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  std::string str(std::size_t n) {
    if (static_cast<std::size_t>(end - p) < n) throw WireError("truncated string");
    std::string s(reinterpret_cast<const char*>(p), n);
    p += n;
    return s;
  }
};

}  // namespace detail

// Serializes the object graph reachable from root (an Obj value). Scalars and
// actor references are inline; boxes cannot appear inside message payloads.
inline std::vector<std::uint8_t> encodeGraph(const std::vector<HeapObject>& heap,
                                             const Value& root) {
  if (root.tag != Value::Tag::Obj) throw WireError("wire root must be an object");
  std::unordered_map<long long, std::uint32_t> nodeIndex;
  std::vector<long long> order;
  // discovery order: preorder walk following fields in declaration order
  std::vector<long long> stack{root.i};
  nodeIndex[root.i] = 0;
  order.push_back(root.i);
  while (!stack.empty()) {
    long long id = stack.back();
    stack.pop_back();
    const HeapObject& obj = heap[static_cast<std::size_t>(id)];
    for (const Value& f : obj.fields) {
      if (f.tag == Value::Tag::Obj && !nodeIndex.count(f.i)) {
        nodeIndex[f.i] = static_cast<std::uint32_t>(order.size());
        order.push_back(f.i);
        stack.push_back(f.i);
      }
    }
  }

  std::vector<std::string> classNames;
  std::unordered_map<const ClassDecl*, std::uint32_t> classIndex;
  for (long long id : order) {
    const ClassDecl* cls = heap[static_cast<std::size_t>(id)].cls;
    if (!classIndex.count(cls)) {
      classIndex[cls] = static_cast<std::uint32_t>(classNames.size());
      classNames.push_back(cls->name);
    }
  }

  std::vector<std::uint8_t> out;
  detail::putU32(out, static_cast<std::uint32_t>(classNames.size()));
  for (const auto& name : classNames) {
    detail::putU32(out, static_cast<std::uint32_t>(name.size()));
    out.insert(out.end(), name.begin(), name.end());
  }
  detail::putU32(out, static_cast<std::uint32_t>(order.size()));
  for (long long id : order) {
    const HeapObject& obj = heap[static_cast<std::size_t>(id)];
    detail::putU32(out, classIndex[obj.cls]);
    detail::putU32(out, static_cast<std::uint32_t>(obj.fields.size()));
    for (const Value& f : obj.fields) {
      switch (f.tag) {
        case Value::Tag::Unit:
          out.push_back(kTagUnit);
          break;
        case Value::Tag::Null:
          out.push_back(kTagNull);
          break;
        case Value::Tag::Int:
          out.push_back(kTagInt);
          detail::putU64(out, static_cast<std::uint64_t>(f.i));
          break;
        case Value::Tag::Bool:
          out.push_back(kTagBool);
          out.push_back(f.b ? 1 : 0);
          break;
        case Value::Tag::Str:
          out.push_back(kTagStr);
          detail::putU32(out, static_cast<std::uint32_t>(f.s->size()));
          out.insert(out.end(), f.s->begin(), f.s->end());
          break;
        case Value::Tag::Obj:
          out.push_back(kTagRef);
          detail::putU32(out, nodeIndex.at(f.i));
          break;
        case Value::Tag::Actor:
          out.push_back(kTagActor);
          detail::putU64(out, static_cast<std::uint64_t>(f.i));
          break;
        case Value::Tag::Box:
          throw WireError("box inside a message payload");
      }
    }
  }
  return out;
}

// Materializes a wire-encoded graph into fresh heap objects on `node`.
inline Value decodeGraph(std::vector<HeapObject>& heap, const std::vector<std::uint8_t>& bytes,
                         int node, const SymbolTable& sym) {
  detail::Reader r{bytes.data(), bytes.data() + bytes.size()};
  std::uint32_t classCount = r.u32();
  std::vector<const ClassDecl*> classes;
  classes.reserve(classCount);
  for (std::uint32_t i = 0; i < classCount; ++i) {
    std::uint32_t len = r.u32();
    std::string name = r.str(len);
    const ClassDecl* cls = sym.classNamed(name);
    if (!cls) throw WireError("unknown class on the wire: " + name);
    classes.push_back(cls);
  }
  std::uint32_t nodeCount = r.u32();
  long long base = static_cast<long long>(heap.size());
  for (std::uint32_t i = 0; i < nodeCount; ++i) heap.push_back(HeapObject{nullptr, {}, node});
  for (std::uint32_t i = 0; i < nodeCount; ++i) {
    std::uint32_t classIdx = r.u32();
    if (classIdx >= classes.size()) throw WireError("bad class index");
    std::uint32_t fieldCount = r.u32();
    HeapObject& obj = heap[static_cast<std::size_t>(base + i)];
    obj.cls = classes[classIdx];
    obj.fields.resize(fieldCount);
    for (std::uint32_t f = 0; f < fieldCount; ++f) {
      switch (r.u8()) {
        case kTagUnit:
          obj.fields[f] = Value::unit();
          break;
        case kTagNull:
          obj.fields[f] = Value::null();
          break;
        case kTagInt:
          obj.fields[f] = Value::ofInt(static_cast<long long>(r.u64()));
          break;
        case kTagBool:
          obj.fields[f] = Value::ofBool(r.u8() != 0);
          break;
        case kTagStr: {
          std::uint32_t len = r.u32();
          obj.fields[f] = Value::ofStr(r.str(len));
          break;
        }
        case kTagRef: {
          std::uint32_t idx = r.u32();
          if (idx >= nodeCount) throw WireError("bad node reference");
          obj.fields[f] = Value::obj(base + idx);
          break;
        }
        case kTagActor:
          obj.fields[f] = Value::actor(static_cast<long long>(r.u64()));
          break;
        default:
          throw WireError("bad field tag");
      }
    }
  }
  return Value::obj(base);
}

}  // namespace wire
}  // namespace casa
