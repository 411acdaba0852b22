#pragma once

// Minimal streaming JSON writer for data exports. Numbers are printed with
// %.17g so every double round-trips exactly. Usage discipline: only one
// child (object/array) of a node may be open at a time; scope child
// handles in blocks, as the callers do.

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>

namespace nlc::emit {

inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_escaped(std::ostream& out, const std::string& s) {
  out << '"';
  for (char c : s) {
    switch (c) {
      case '"': out << "\\\""; break;
      case '\\': out << "\\\\"; break;
      case '\n': out << "\\n"; break;
      case '\t': out << "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out << buf;
        } else {
          out << c;
        }
    }
  }
  out << '"';
}

class Array;

class Object {
 public:
  explicit Object(std::ostream& out) : out_(out) { out_ << '{'; }
  Object(Object&& other) noexcept : out_(other.out_), first_(other.first_) { other.live_ = false; }
  Object(const Object&) = delete;
  ~Object() {
    if (live_) out_ << '}';
  }

  void field(const char* name, double v) {
    key(name);
    out_ << g17(v);
  }
  void field(const char* name, int v) {
    key(name);
    out_ << v;
  }
  void field(const char* name, std::uint64_t v) {
    key(name);
    out_ << v;
  }
  void field(const char* name, bool v) {
    key(name);
    out_ << (v ? "true" : "false");
  }
  void field(const char* name, const std::string& v) {
    key(name);
    write_escaped(out_, v);
  }
  void field(const char* name, const char* v) { field(name, std::string(v)); }
  void null_field(const char* name) {
    key(name);
    out_ << "null";
  }
  Object object(const char* name) {
    key(name);
    return Object(out_);
  }
  Array array(const char* name);

 private:
  friend class Array;
  std::ostream& out_;
  bool first_ = true;
  bool live_ = true;

  void key(const char* name) {
    if (!first_) out_ << ',';
    first_ = false;
    write_escaped(out_, name);
    out_ << ':';
  }
};

class Array {
 public:
  explicit Array(std::ostream& out) : out_(out) { out_ << '['; }
  Array(Array&& other) noexcept : out_(other.out_), first_(other.first_) { other.live_ = false; }
  Array(const Array&) = delete;
  ~Array() {
    if (live_) out_ << ']';
  }

  void value(double v) {
    sep();
    out_ << g17(v);
  }
  void value(int v) {
    sep();
    out_ << v;
  }
  void value(const std::string& v) {
    sep();
    write_escaped(out_, v);
  }
  Array array() {
    sep();
    return Array(out_);
  }
  Object object() {
    sep();
    return Object(out_);
  }

 private:
  std::ostream& out_;
  bool first_ = true;
  bool live_ = true;

  void sep() {
    if (!first_) out_ << ',';
    first_ = false;
  }
};

inline Array Object::array(const char* name) {
  key(name);
  return Array(out_);
}

}  // namespace nlc::emit
