//! Reference values produced by tests/oracles/goldens.py.
#![allow(dead_code)]

pub const MG_FIRST_40: [f64; 40] = [
    1.2,
    1.1175622107684322,
    1.0429694144115478,
    0.9754750611519023,
    0.9144036448164377,
    0.8591439421436569,
    0.809142895455783,
    0.7639000774716318,
    0.7229626828621815,
    0.6859209964226473,
    0.6524042925050015,
    0.6220771246710832,
    0.5946359684318974,
    0.569806183472511,
    0.5473392649594718,
    0.5270103564209092,
    0.5086159993073869,
    0.4919720967103561,
    0.4869790108064821,
    0.5062816860075561,
    0.5501171097511304,
    0.6125448531449588,
    0.6838789793029116,
    0.7551177948693533,
    0.8203497142482279,
    0.876691295791377,
    0.9232931154160643,
    0.9604259545013657,
    0.9888896858933511,
    1.009683772944707,
    1.0238382549950844,
    1.0323329708278548,
    1.0360628742909461,
    1.0358267110278845,
    1.0323271882947078,
    1.0268124534143785,
    1.0231625321491442,
    1.0258663059599806,
    1.0382559555050546,
    1.0611860369269468,
];
pub const ZENG_LI_PAIRS: [f64; 2] = [
    0.6575026390895577,
    0.8665897669995142,
];
pub const JACCARD_IT2_PAIRS: [f64; 2] = [
    0.00471302085616972,
    0.42445927345128165,
];
pub const KERNEL_SAMPLES: [f64; 36] = [
    0.625095466604667,
    0.8972138009695755,
    0.7756856902451935,
    0.22520718999059186,
    0.30016628491122543,
    0.8735534453962619,
    0.005265304565574724,
    0.8212284183827663,
    0.7970694287520462,
    0.4679349528437208,
    0.3030324268193135,
    0.2784256121007733,
    0.2548695876541246,
    0.4450763058826466,
    0.5045482589579533,
    0.5534973520744925,
    0.9955002834343927,
    0.7926619192137531,
    0.6221792294411627,
    0.9889601476818849,
    0.21530869823559895,
    0.16021203385784455,
    0.6125396042730308,
    0.04394200796138337,
    0.03568027877359614,
    0.5148888202713703,
    0.4662060253252891,
    0.9171677731928523,
    0.6292262544910104,
    0.5141176465995139,
    0.49687343539350426,
    0.24751492202733083,
    0.01179402554250586,
    0.19240214398531064,
    0.6920321208818392,
    0.2006067239869952,
];
pub const KERNEL_SIZES: [f64; 12] = [
    0.3,
    0.420105483094166,
    0.40989225207773117,
    0.4604214957420835,
    0.42241818102649475,
    0.4320874604978727,
    0.45841027977491405,
    0.474099479421246,
    0.4618662504457259,
    0.472568573757958,
    0.4892105914705266,
    0.47851112108166577,
];
