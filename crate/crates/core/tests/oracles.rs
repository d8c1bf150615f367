//! Values frozen from a 40-digit mpmath evaluation (tools/oracles.py).

use excesslab::functionals::{cov_like, delta, delta_abc, excess, excess_of_sum, minkowski_g, minkowski_g_prime};
use excesslab::scalar_analysis::{bernoulli_second_derivative, h_chain};
use excesslab::{Axis, Exponents, JointDistribution, MassAtInfinity};

const D1: &[(f64, f64, f64)] = &[(0.5, 2.0, 0.3), (1.5, 0.2, 0.5), (3.0, 1.0, 0.2)];
const D2: &[(f64, f64, f64)] = &[(0.0, 0.1, 0.5), (1.0, 1.1, 0.5)];
const D3: &[(f64, f64, f64)] = &[(2.0, 0.0, 0.25), (0.0, 3.0, 0.25), (1.0, 1.0, 0.5)];

/// `(dist, p, theta, [E(X), E(Y), E(X + Y), C(X, Y), Delta, g(1/2), g'(1/2)])`.
#[allow(clippy::type_complexity)]
const FUNCTIONALS: &[(&[(f64, f64, f64)], f64, f64, [f64; 7])] = &[
    (D1, 1.5, 1.0, [0.37183421283331524, 0.38558889703599624, 0.31412182951335299, -0.20912166688756726, -0.4442468753189469, -0.28279821103250399, -0.42566943115264838]),
    (D1, 1.5, 0.5, [1.2599938293604351, 0.85557252713162218, 1.8809034101998604, 0.5034372856618655, -0.45693814250922902, -0.14841459536613634, -0.21790273081677068]),
    (D1, 2.0, 1.0, [0.86602540378443865, 0.78102496759066543, 0.87177978870813472, -0.29999999999999999, -0.97638746292343413, -0.48032915276677017, -0.77458340132665711]),
    (D1, 1.25, 0.0, [1.5616858052803724, 0.98428765782720753, 2.4370966287505632, 0.87842084371275938, -0.22190282530863113, -0.069461099053806904, -0.099584176937090691]),
    (D1, 3.0, 0.7, [1.8138210741339874, 1.3302479421671166, 2.4772532892298133, 1.4804250000000002, -2.8960200788948708, -0.39178240237452652, -0.66863080795046391]),
    (D1, 3.0, 1.0, [1.5536162529769294, 1.233106037165235, 1.8291548547541672, 0.15000000000000004, -2.826376972440374, -0.55410390785859997, -0.99044495634296934]),
    (D1, 1.01, 1.0, [0.0026997779493067424, 0.0037272289897449453, 0.0015893764140112824, -0.0051854701901462332, -0.0086986417291751293, -0.0031163879766853241, -0.0043682539309782913]),
    (D1, 10.0, 0.25, [2.554642628695773, 1.7732517057234614, 3.4101387990001128, 3940.4454748163002, -4277.0936419560869, -0.46118864116750215, -0.92129929484659489]),
    (D2, 1.5, 1.0, [0.27783452622806125, 0.25384955639494708, 0.52804803835325593, 0.1257359312880715, -0.0080681978752204793, -0.0027238845966345585, -0.0026622202705914155]),
    (D2, 1.5, 0.5, [0.52002095576297603, 0.56823163512141626, 1.0845793785874397, 0.40000000000000003, -0.0097659157944693019, -0.0026963329764782596, -0.0028048803507479877]),
    (D2, 2.0, 1.0, [0.5, 0.50000000000000004, 1.0, 0.25000000000000002, 0.0, 0.0, 0.0]),
    (D2, 1.25, 0.0, [0.5743491774985175, 0.65689063228071828, 1.227549971516535, 0.55000000000000004, -0.0218565099559264, -0.0028301703316148816, -0.0025450937031966999]),
    (D2, 3.0, 0.7, [0.77033268358697175, 0.83962568356396688, 1.6101525002466987, 0.49855000000000005, 3.0567157297546214e-4, 1.4275542295754829e-4, 1.5381685043953703e-4]),
    (D2, 3.0, 1.0, [0.72112478515370419, 0.76630943239355317, 1.4888055529538275, 0.40000000000000003, 0.0015030365565208503, 9.2994824163523728e-4, 0.0011971298231941029]),
    (D2, 1.01, 1.0, [0.0036531250553073579, 0.0025933779329600004, 0.0059286166940151595, -0.04585549726222154, -0.048307339128322731, -2.5549960287527578e-4, -1.9053661928495813e-4]),
    (D2, 10.0, 0.25, [0.93303299136301648, 1.0263362902380875, 1.9593692816461681, 0.54999999888241295, 4.6857828696853621e-11, 2.9957465496846465e-11, 4.0591101897744038e-11]),
    (D3, 1.5, 1.0, [0.3500495679823036, 0.54423592693139548, 0.12718585055488749, -0.75, -1.0719971151015292, -0.56556047835575874, -0.80697922988493347]),
    (D3, 1.5, 0.5, [0.89981617257599871, 1.1941493224195539, 1.7054089071851583, 0.058058261758407797, -1.0746955540658826, -0.27385487651940482, -0.31924622318966679]),
    (D3, 2.0, 1.0, [0.70710678118654752, 1.0897247358851684, 0.43301270189221932, -0.75, -1.5205517503711221, -1.0354627981830221, -1.8114125723722006]),
    (D3, 1.25, 0.0, [1.0749926236288255, 1.3736046246803066, 2.2599167537553563, 0.5, -0.89866309379861639, -0.13331417009608926, -0.14902460435594816]),
    (D3, 3.0, 0.7, [1.2920620826625109, 1.8738882298015958, 2.0679187171946349, 0.071250000000000082, -3.057064781401889, -0.77729491785926216, -1.0765646579909472]),
    (D3, 3.0, 1.0, [1.1447142425533319, 1.743170662235015, 1.1077619054234085, -0.75, -3.0341997558449194, -1.3946508445122656, -3.0066843393865877]),
    (D3, 1.01, 1.0, [0.0036782821060909864, 0.0057830534391083154, 4.3032755530244552e-4, -0.75, -0.75546781303285425, -0.0064171329480182968, -0.0068803621199702155]),
    (D3, 10.0, 0.25, [1.7414408862479317, 2.6116605353065648, 2.6249306613456399, 0.49999880790710449, -384.17623689182531, -1.2787786595019397, -2.3276715444539657]),
];

/// `(p, s, [h, h1, h2])`.
const CHAIN: &[(f64, f64, [f64; 3])] = &[
    (1.25, 0.5, [0.0027759935990514213, 0.016370900578822486, 0.04844730054127289]),
    (1.5, 3.0, [4.3440652836959656, 3.2652022308514285, 0.39572508544423897]),
    (1.9, 10.0, [2093.3286683564652, 932.90314163547523, 0.10378409328633669]),
    (1.05, 50.0, [6.0921895879575458e+20, 5.7730156635287719e+19, 0.11622387268827297]),
];

/// `(p, theta, delta''(0+))` for the Bernoulli shift.
const SECOND_DERIVATIVE: &[(f64, f64, f64)] = &[
    (2.5, 0.25, 0.0083789831514965892),
    (2.5, 0.5, 0.05),
    (2.5, 1.0, 0.41018862050852037),
    (3.0, 0.25, 0.0039215686274509804),
    (3.0, 0.5, 0.032258064516129032),
    (3.0, 1.0, 0.33333333333333333),
    (4.0, 0.25, 7.3277967757694187e-4),
    (4.0, 0.5, 0.011811023622047244),
    (4.0, 1.0, 0.21428571428571429),
    (10.0, 0.25, 8.381903187151818e-9),
    (10.0, 0.5, 8.583085218592107e-6),
    (10.0, 1.0, 0.0088062622309197652),
];

fn close(got: f64, want: f64, rel: f64, abs: f64) -> bool {
    (got - want).abs() <= abs + rel * want.abs()
}

#[test]
fn functionals_match_reference() {
    for (atoms, p, theta, want) in FUNCTIONALS {
        let d = JointDistribution::from_triples(atoms).unwrap();
        let e = Exponents::new(*p, *theta).unwrap();
        let got = [
            excess(&d, Axis::X, &e).unwrap(),
            excess(&d, Axis::Y, &e).unwrap(),
            excess_of_sum(&d, &e, 1.0).unwrap(),
            cov_like(&d, &e),
            delta(&d, &e).unwrap(),
            minkowski_g(&d, &e, 0.5).unwrap(),
            minkowski_g_prime(&d, &e, 0.5).unwrap(),
        ];
        let scale = want.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for k in 0..7 {
            assert!(close(got[k], want[k], 1e-11, 1e-13 * scale), "p = {p}, theta = {theta}, k = {k}: {} vs {}", got[k], want[k]);
        }
    }
}

#[test]
fn delta_abc_matches_reference() {
    let d = JointDistribution::from_triples(D1).unwrap();
    let e = Exponents::new(1.5, 1.0).unwrap();
    let m = MassAtInfinity::new(0.1, 0.3, 0.2).unwrap();
    assert!(close(delta_abc(&d, &e, &m).unwrap(), -0.57591820613107658, 1e-13, 0.0));
}

#[test]
fn chain_matches_reference() {
    for (p, s, want) in CHAIN {
        let c = h_chain(*p, *s).unwrap();
        for (got, want) in [c.h, c.h1, c.h2].into_iter().zip(want) {
            assert!(close(got, *want, 1e-11, 1e-14), "p = {p}, s = {s}: {got} vs {want}");
        }
    }
}

#[test]
fn bernoulli_second_derivative_matches_reference() {
    for (p, theta, want) in SECOND_DERIVATIVE {
        let got = bernoulli_second_derivative(&Exponents::new(*p, *theta).unwrap()).unwrap();
        assert!(close(got, *want, 1e-14, 0.0), "p = {p}, theta = {theta}");
    }
}
