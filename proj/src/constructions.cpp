#include "covsys/constructions.hpp"

#include <string>

namespace covsys {

namespace {

const char* const kExample = R"(node 2 {
  node 3 {
    node 3 {
      node 5 {
        wedge {2, 3} x [5] take 4;
        leaf [3^2*5];
      }
      leaf [3^2];
      node 5 {
        wedge {2, 3} x [5] take 4;
        leaf [2*3^2*5];
      }
    }
    wedge {2} x [3] take 2;
  }
  leaf [2];
}
)";

const char* const kThreePower = R"(node 3 {
  power 3;
  leaf [3];
  node 2 {
    leaf [3*2];
    node 2 {
      wedge {3} x [2^2] take 2;
    }
  }
}
)";

const char* const kSixSevens = R"(
node 7 {
  node 3 {
    node 5 {
      node 11 {
        node 13 {
          wedge {7, 3, 5, 11} x [13] take 13;
        }
        node 17 {
          node 13 {
            wedge {7, 3, 5, 11} x [17*13] take 13;
          }
          wedge {7, 3, 5, 11} x [17] take 16;
        }
        node 19 {
          node 13 {
            wedge {7, 3, 5, 11} x [19*13] take 13;
          }
          node 17 {
            node 13 {
              wedge {7, 3, 5, 11} x [19*17*13] take 13;
            }
            wedge {7, 3, 5, 11} x [19*17] take 16;
          }
          node 23 {
            wedge {7, 3, 5, 11, 19} x [23] take 23;
          }
          wedge {7, 3, 5, 11} x [19] take 16;
        }
        wedge {7, 3, 5} x [11] take 8;
      }
      wedge {7, 3} x [5] take 4;
    }
    wedge {7} x [3] take 2;
  }
  leaf [7];
  leaf [7];
  leaf [7];
  leaf [7];
  leaf [7];
  leaf [7];
}
)";

const char* const kFourSevens = R"(
node 7 {
  node 3 {
    power 3;
    wedge {7} x [3] take 2;
  }
  node 3 {
    power 3;
    leaf [3];
    node 5 {
      power 5;
      wedge {7, 3} x [5] take 4;
    }
  }
  node 3 {
    power 3;
    leaf [3];
    node 5 {
      power 5;
      wedge {3} x [5] take 2;
      node 11 {
        power 11;
        wedge {7, 3} x [11] take 4;
        wedge {7, 3} x [5*11] take 4;
        node 17 {
          power 17;
          wedge {7, 3, 5} x [17] take 8;
          wedge {7, 3, 5} x [11*17] take 8;
        }
        node 19 {
          power 19;
          wedge {7, 3, 5} x [19] take 8;
          wedge {7, 3, 5} x [11*19] take 8;
          node 17 {
            power 17;
            wedge {7, 3, 5} x [17] take 8;
            wedge {7, 3, 5} x [19*17] take 8;
          }
          node 17 {
            power 17;
            wedge {7, 3, 5} x [17] take 8;
            wedge {7, 3, 5} x [11*19*17] take 8;
          }
        }
      }
      node 7 {
        power 7^2;
        wedge {3, 5} x [7^2] take 4;
        node 13 {
          power 13;
          wedge {7, 3, 5} x [13] take 8;
          wedge {3, 5} x [7^2*13] take 4;
        }
        node 11 {
          power 11;
          wedge {7, 3} x [11] take 4;
          wedge {3, 5} x [7^2*11] take 4;
          node 13 {
            power 13;
            wedge {7, 3, 5} x [13] take 8;
            wedge {7, 3} x [11*13] take 4;
          }
          node 13 {
            power 13;
            wedge {7, 3, 5} x [13] take 8;
            wedge {7, 3} x [5*11*13] take 4;
          }
        }
      }
    }
  }
  leaf [7];
  leaf [7];
  leaf [7];
  leaf [7];
}
)";

const char* const kSevenElevens = R"(
node 11 {
  node 3 {
    power 3;
    wedge {11} x [3] take 2;
  }
  node 3 {
    power 3;
    leaf [3];
    node 5 {
      power 5;
      wedge {3} x [5] take 2;
      leaf [11*5];
      node 7 {
        power 7;
        wedge {3} x [7] take 2;
        wedge {3} x [5*7] take 2;
        node 13 {
          power 13;
          wedge {11, 3, 5} x [13] take 8;
          wedge {11, 3} x [7*13] take 4;
        }
        node 13 {
          power 13;
          wedge {11, 3, 5} x [13] take 8;
          wedge {11, 3} x [5*7*13] take 4;
        }
      }
    }
  }
  node 3 {
    power 3;
    leaf [3];
    node 5 {
      power 5;
      wedge {3} x [5] take 2;
      leaf [11*3*5];
      node 7 {
        power 7;
        wedge {3} x [7] take 2;
        wedge {3} x [5*7] take 2;
        node 17 {
          power 17;
          wedge {11, 3, 5, 7} x [17] take 16;
        }
        node 19 {
          power 19;
          wedge {11, 3, 5, 7} x [19] take 16;
          node 13 {
            power 13;
            wedge {11, 3, 5, 7} x [19*13] take 12;
          }
          node 17 {
            power 17;
            wedge {11, 3, 5, 7} x [19*17] take 16;
          }
        }
      }
    }
  }
  node 3 {
    power 3;
    leaf [3];
    node 5 {
      power 5;
      wedge {3} x [5] take 2;
      node 7 {
        power 7;
        wedge {3} x [7] take 2;
        wedge {3} x [11*5*7] take 2;
        wedge {3} x [11*7] take 2;
      }
      node 7 {
        power 7;
        wedge {3} x [7] take 2;
        wedge {3} x [5*7] take 2;
        wedge {3} x [11*7] take 2;
      }
    }
  }
  leaf [11];
  leaf [11];
  leaf [11];
  leaf [11];
  leaf [11];
  leaf [11];
  leaf [11];
}
)";

// {P} is the designated prime p; {LEAVES} expands to p-5 leaves of modulus p.
const char* const kPMinusFive = R"(
node {P} {
  node 3 {
    power 3;
    wedge {{P}} x [3] take 2;
  }
  node 3 {
    power 3;
    leaf [3];
    node 5 {
      power 5;
      wedge {3} x [5] take 2;
      leaf [{P}*5];
      node 7 {
        power 7;
        wedge {3, 5} x [7] take 4;
        leaf [{P}*5*7];
        node 11 {
          power 11;
          wedge {3, 7} x [5*11] take 4;
          wedge {3, 7} x [11] take 4;
          wedge {3} x [{P}*5*11] take 2;
        }
      }
    }
  }
  node 3 {
    power 3;
    leaf [3];
    node 5 {
      power 5;
      wedge {3} x [5] take 2;
      leaf [{P}*3*5];
      node 7 {
        power 7;
        wedge {3, 5} x [7] take 4;
        leaf [{P}*3*5*7];
        node 11 {
          power 11;
          wedge {3, 7} x [5*11] take 4;
          wedge {3, 7} x [11] take 4;
          wedge {3} x [{P}*5*7*11] take 2;
        }
      }
    }
  }
  node 3 {
    power 3;
    leaf [3];
    node 5 {
      power 5;
      wedge {3} x [5] take 2;
      node 7 {
        power 7;
        wedge {3} x [7] take 2;
        node 13 {
          power 13;
          wedge {{P}, 3, 5} x [13] take 8;
          wedge {3, 5} x [7*13] take 4;
        }
        node 13 {
          power 13;
          wedge {{P}, 3, 5} x [13] take 8;
          wedge {3, 5} x [{P}*7*13] take 4;
        }
        leaf [{P}*7];
        node 11 {
          power 11;
          node 13 {
            power 13;
            wedge {{P}, 3, 5} x [13] take 8;
            wedge {{P}, 3} x [11*13] take 4;
          }
          node 13 {
            power 13;
            wedge {{P}, 3, 5} x [13] take 8;
            wedge {{P}, 3} x [5*11*13] take 4;
          }
          node 13 {
            power 13;
            wedge {{P}, 3, 5} x [13] take 8;
            wedge {{P}, 3} x [7*11*13] take 4;
          }
          node 13 {
            power 13;
            wedge {{P}, 3, 5} x [13] take 8;
            wedge {{P}, 3} x [5*7*11*13] take 4;
          }
          wedge {3, 7} x [11] take 4;
          wedge {3} x [{P}*11] take 2;
        }
      }
      node 7 {
        power 7;
        wedge {3, 5} x [7] take 4;
        leaf [{P}*7];
        node 11 {
          power 11;
          wedge {3, 7} x [5*11] take 4;
          wedge {3, 7} x [11] take 4;
          wedge {3} x [{P}*11] take 2;
        }
      }
    }
  }
  node 3 {
    power 3;
    leaf [3];
    node 5 {
      power 5;
      wedge {3} x [5] take 2;
      node 7 {
        power 7;
        wedge {3} x [7] take 2;
        node 17 {
          power 17;
          wedge {{P}, 3, 5} x [17] take 8;
          wedge {{P}, 3, 5} x [7*17] take 8;
        }
        node 19 {
          power 19;
          wedge {{P}, 3, 5} x [19] take 8;
          wedge {{P}, 3, 5} x [7*19] take 8;
          node 17 {
            power 17;
            wedge {{P}, 3, 5} x [17] take 8;
            wedge {{P}, 3, 5} x [19*17] take 8;
          }
          node 17 {
            power 17;
            wedge {{P}, 3, 5} x [17] take 8;
            wedge {{P}, 3, 5} x [7*19*17] take 8;
          }
        }
        leaf [{P}*3*7];
        node 11 {
          power 11;
          node 17 {
            power 17;
            wedge {{P}, 3, 5} x [17] take 8;
            wedge {{P}, 3, 5} x [11*17] take 8;
          }
          node 17 {
            power 17;
            wedge {{P}, 3, 5} x [17] take 8;
            wedge {{P}, 3, 5} x [7*11*17] take 8;
          }
          node 19 {
            power 19;
            wedge {{P}, 3, 5} x [19] take 8;
            wedge {{P}, 3, 5} x [11*19] take 8;
            node 17 {
              power 17;
              wedge {{P}, 3, 5} x [17] take 8;
              wedge {{P}, 3, 5} x [19*17] take 8;
            }
            node 17 {
              power 17;
              wedge {{P}, 3, 5} x [17] take 8;
              wedge {{P}, 3, 5} x [11*19*17] take 8;
            }
          }
          node 19 {
            power 19;
            wedge {{P}, 3, 5} x [19] take 8;
            wedge {{P}, 3, 5} x [7*11*19] take 8;
            node 17 {
              power 17;
              wedge {{P}, 3, 5} x [17] take 8;
              wedge {{P}, 3, 5} x [19*17] take 8;
            }
            node 17 {
              power 17;
              wedge {{P}, 3, 5} x [17] take 8;
              wedge {{P}, 3, 5} x [7*11*19*17] take 8;
            }
          }
          wedge {3, 7} x [11] take 4;
          wedge {3} x [{P}*7*11] take 2;
        }
      }
      node 7 {
        power 7;
        wedge {3, 5} x [7] take 4;
        leaf [{P}*3*7];
        node 11 {
          power 11;
          wedge {3, 7} x [5*11] take 4;
          wedge {3, 7} x [11] take 4;
          wedge {3} x [{P}*7*11] take 2;
        }
      }
    }
  }
{LEAVES}}
)";

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) s.replace(pos, from.size(), to);
}

void require_q(std::uint64_t q) {
  if (!is_prime(q)) throw Error(ErrorKind::NonPrime, "q = " + std::to_string(q) + " is not prime");
  if (q <= 19) throw Error(ErrorKind::QTooSmall, "q must exceed 19, got " + std::to_string(q));
}

TreeSpec with_q(TreeSpec t, std::uint64_t q) {
  t.declared_q = q;
  return t;
}

}  // namespace

CoveringSystem example_system() {
  return parse_system(
      "1 % 2\n1 % 3\n2 % 2*3\n3 % 3^2\n0 % 5\n6 % 2*5\n12 % 3*5\n18 % 2*3*5\n9 % 3^2*5\n24 % 2*3^2*5\n");
}

TreeSpec example_tree() { return parse_tree(kExample); }

TreeSpec fig4_tree(std::uint64_t p) {
  if (!is_prime(p)) throw Error(ErrorKind::NonPrime, std::to_string(p) + " is not prime");
  if (p <= 3) throw Error(ErrorKind::PreconditionViolated, "p must exceed 3, got " + std::to_string(p));
  return with_q(parse_tree(kThreePower), p);
}

TreeSpec six_sevens_tree() { return parse_tree(kSixSevens); }

TreeSpec four_sevens_tree(std::uint64_t q) {
  require_q(q);
  return with_q(parse_tree(kFourSevens), q);
}

TreeSpec seven_elevens_tree(std::uint64_t q) {
  require_q(q);
  return with_q(parse_tree(kSevenElevens), q);
}

TreeSpec p_minus_five_tree(std::uint64_t p, std::uint64_t q) {
  if (!is_prime(p)) throw Error(ErrorKind::NonPrime, "p = " + std::to_string(p) + " is not prime");
  if (p < 23) throw Error(ErrorKind::PreconditionViolated, "p must be at least 23, got " + std::to_string(p));
  if (p >> 31) throw Error(ErrorKind::Unsupported, "p must stay below 2^31");
  require_q(q);
  if (q == p) throw Error(ErrorKind::QCollision, "q must differ from p");
  std::string text = kPMinusFive;
  std::string leaves;
  for (std::uint64_t i = 0; i + 5 < p; ++i) leaves += "  leaf [{P}];\n";
  replace_all(text, "{LEAVES}", leaves);
  replace_all(text, "{P}", std::to_string(p));
  return with_q(parse_tree(text), q);
}

std::optional<Construction> find_construction(const std::string& name) {
  for (auto& c : constructions()) {
    if (c.name == name) return c;
  }
  return std::nullopt;
}

const std::vector<Construction>& constructions() {
  static const std::vector<Construction> all = {
      {"example", false, false, 0, 2},
      {"fig4", true, false, 5, 2},
      {"six7", false, false, 0, 7},
      {"four7", false, true, 0, 7},
      {"seven11", false, true, 0, 11},
      {"pminus5", true, true, 23, 0},
  };
  return all;
}

TreeSpec build_tree(const std::string& name, std::uint64_t p, std::uint64_t q) {
  if (name == "example") return example_tree();
  if (name == "fig4") return fig4_tree(p);
  if (name == "six7") return six_sevens_tree();
  if (name == "four7") return four_sevens_tree(q);
  if (name == "seven11") return seven_elevens_tree(q);
  if (name == "pminus5") return p_minus_five_tree(p, q);
  throw Error(ErrorKind::InvalidArgument, "unknown construction '" + name + "'");
}

}  // namespace covsys
