#pragma once

#include <optional>

#include "dichotomy/family.hpp"

namespace dichotomy {

/// Dichotomy constants, in one of the two equivalent forms:
///   Form A: |Phi(k,m)P(m)| <= L e^{-a(k-m)},  |Phi(m,k)(I-P(k))| <= L e^{-a(k-m)}
///   Form B: |P(k)|,|I-P(k)| <= M plus the vector-wise decay/growth bounds with K.
/// The forms convert with L = K M and M = K = L.
struct Form {
    enum class Kind { A, B };
    Kind kind = Kind::A;
    double L = 1.0;      // Form A
    double M = 1.0;      // Form B
    double K = 1.0;      // Form B
    double alpha = 1.0;  // shared exponent

    static Form formA(double l, double alpha);
    static Form formB(double m, double k, double alpha);
    Form as_formA() const;
    Form as_formB() const;
};

/// A dichotomy claim: sequence + projection family + constants, together
/// with the finite window on which the claim has been checked. Certificates
/// never claim an infinite interval; the window is the deliverable.
struct DichotomyCertificate {
    SequencePtr seq;
    ProjectionFamily family;
    Form form;
    Interval verified_window = Interval::finite(0, 0);
    /// Set by convert_certificate: the form this certificate was converted
    /// from, used to flag round-trip constant inflation.
    std::optional<Form::Kind> origin_form;

    int rank() const { return family.rank(); }
    int dim() const { return family.dim(); }
};

struct ConversionResult {
    DichotomyCertificate certificate;
    bool roundtrip_inflation = false;
};

/// Form B -> Form A with L = KM; Form A -> Form B with M = K = L (same alpha).
ConversionResult convert_certificate(const DichotomyCertificate& cert, Form::Kind target);

}  // namespace dichotomy
