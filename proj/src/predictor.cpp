#include "anchor/predictor.hpp"

#include <stdexcept>

namespace anchor {

const char* method_name(Method method) {
  switch (method) {
    case Method::kOls: return "ols";
    case Method::kAnchor: return "anchor";
    case Method::kPar: return "par";
    case Method::kXpar: return "xpar";
    case Method::kTar: return "tar";
    case Method::kPtar: return "ptar";
    case Method::kXtar: return "xtar";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "ols") return Method::kOls;
  if (name == "anchor" || name == "ar") return Method::kAnchor;
  if (name == "par") return Method::kPar;
  if (name == "xpar") return Method::kXpar;
  if (name == "tar") return Method::kTar;
  if (name == "ptar") return Method::kPtar;
  if (name == "xtar") return Method::kXtar;
  throw std::invalid_argument("unknown method '" + name +
                              "' (expected ols, anchor, par, xpar, tar, ptar, or xtar)");
}

}  // namespace anchor
