//! Sentence pools for the synthetic filings.
//!
//! `{name}` is replaced by a generated proper noun and `{date}` by a
//! rendered date. No sentence may place a month name directly before a
//! number, and none may contain the word "item".

pub(super) struct Theme {
    pub sentences: &'static [&'static str],
    /// `(first mention, follow-up)` sentences describing one dated event.
    pub events: &'static [(&'static str, &'static str)],
    /// Business lines or assets a paragraph can focus on.
    pub focus: &'static [&'static str],
}

pub(super) struct FirmText {
    pub theme: Theme,
    pub market: &'static [&'static str],
    pub business: &'static str,
}

pub(super) const GENERIC: &[&str] = &[
    "Our business, financial condition and results of operations could be materially and adversely affected by any of the risks described in this section.",
    "The risks described here are not the only risks we face, and additional risks not presently known to us could also impair our operations.",
    "If any of these events occur, the trading price of our common stock could decline and investors could lose part of their investment.",
    "We cannot provide assurance that our risk management efforts will be effective in every circumstance.",
    "Unfavorable developments could require us to revise our guidance, which could cause volatility in the price of our shares.",
    "Management evaluates these matters regularly, but future outcomes remain inherently uncertain.",
];

pub(super) const ACCOUNTING: &[&str] = &[
    "As of {date}, we had not recorded any material charge related to these matters.",
    "For the fiscal year ended {date}, these factors did not have a material effect on our reported results.",
    "Our assessment as of {date} reflected the information available at that time.",
];

/// Opening and closing sentences naming a paragraph's two focus words.
pub(super) const FOCUS_OPEN: &[&str] = &[
    "This risk applies in particular to our {a}, {b} and {c} business lines.",
    "The following discussion concerns our {a}, {b} and {c} activities.",
    "Our {a}, {b} and {c} operations are most exposed to this risk.",
];

pub(super) const FOCUS_MID: &[&str] = &[
    "Demand for our {a}, {b} and {c} offerings is sensitive to these conditions.",
    "Margins in our {a}, {b} and {c} lines depend on these factors.",
    "Customers of our {a}, {b} and {c} units may respond by delaying purchases.",
];

pub(super) const FOCUS_CLOSE: &[&str] = &[
    "Any of these developments could affect our {a}, {b} and {c} results.",
    "We continue to monitor these exposures in our {a}, {b} and {c} operations.",
    "The impact on our {a}, {b} and {c} revenue could be significant.",
];

pub(super) const SHARED_MARKET: &str = "We are exposed to market risks in the ordinary course of business, including changes in interest rates, foreign currency exchange rates and equity prices. A hypothetical one percentage point increase in interest rates would change the fair value of our investment portfolio by an immaterial amount. We do not hold derivative financial instruments for trading or speculative purposes. Our cash equivalents consist primarily of money market funds and short term treasury securities. Exposure to foreign currency fluctuations is limited because most of our revenue and operating expenses are denominated in United States dollars.";

/// Shared by the first two firms only.
pub(super) const PLANTED: Theme = Theme {
    sentences: &[
        "We depend on a single contract foundry to fabricate the custom chips used in our products, and we do not have a long term supply agreement with that foundry.",
        "Any disruption at the foundry, including power outages, earthquakes or export restrictions, could halt wafer shipments to us for several months.",
        "Qualifying an alternative foundry would take at least twelve months and would require us to redesign several of our chips.",
        "Wafer allocation is determined by the foundry, and larger customers of the foundry may receive priority when capacity is constrained.",
        "Rising wafer prices and expedite fees charged by the foundry have reduced our gross margins and could continue to do so.",
        "Trade tensions and export controls affecting chip fabrication could restrict our access to the advanced process nodes offered by the foundry.",
        "Our assembly and test subcontractors are located near the foundry, which compounds our exposure to regional disruptions in chip supply.",
        "Shortages of substrates and packaging materials at the foundry have lengthened chip lead times beyond fifty weeks.",
        "If the foundry fails to meet wafer yield targets, our cost per chip increases and deliveries to our customers are delayed.",
        "We hold limited buffer inventory of finished chips, so even a short interruption at the foundry would reduce our revenue.",
    ],
    events: &[
        (
            "On {date}, an earthquake near the {name} fabrication campus of our foundry interrupted wafer production for several weeks.",
            "The foundry outage at the {name} campus that began on {date} delayed chip shipments and forced us to allocate scarce wafers among customers.",
        ),
        (
            "On {date}, the foundry notified us that wafer capacity on the {name} process line would be reduced for the remainder of the year.",
            "Following the {name} capacity reduction announced on {date}, the foundry extended chip lead times and raised wafer prices.",
        ),
        (
            "On {date}, new export rules restricted shipments of chips fabricated on the {name} node at our foundry.",
            "Because of the {name} export rules effective {date}, we redesigned part of our chip portfolio for a different foundry process.",
        ),
    ],
    focus: &["microcontrollers", "sensors", "modems", "processors"],
};

/// Shared by the fifth and sixth firms only.
pub(super) const SECONDARY: Theme = Theme {
    sentences: &[
        "We collect and store protected health information about patients, and a breach of that information could expose us to penalties under federal privacy law.",
        "Ransomware attacks against healthcare organizations have increased, and an attack on our patient record systems could disrupt care and billing.",
        "Regulators may impose corrective action plans and fines if our safeguards for patient health information are found to be inadequate.",
        "Third party vendors that process patient health information on our behalf may not maintain adequate privacy and security controls.",
        "Class action litigation following a health data breach could be costly and could damage our reputation with patients and physicians.",
        "State laws governing patient health information are evolving and may impose obligations that differ from federal privacy rules.",
    ],
    events: &[
        (
            "On {date}, we detected unauthorized access to the {name} patient portal and notified affected patients and regulators.",
            "The {name} patient portal incident discovered on {date} remains under review by federal privacy regulators.",
        ),
        (
            "On {date}, a ransomware attack encrypted servers at the {name} records center that stores patient health information.",
            "After the {name} ransomware attack of {date}, we restored patient record systems and strengthened our security controls.",
        ),
    ],
    focus: &["telehealth", "pharmacy", "laboratory", "billing", "imaging", "scheduling"],
};

pub(super) const FIRMS: [FirmText; 8] = [
    FirmText {
        business: "We design residential solar energy systems, including panels, inverters and battery storage, and sell them through a network of independent installers.",
        theme: Theme {
            sentences: &[
                "Demand for residential solar systems depends on net metering policies that allow homeowners to sell excess electricity back to utilities.",
                "Changes to federal investment tax credits for solar installations could reduce homeowner demand for our systems.",
                "Many homeowners finance solar installations through loans or leases, and higher interest rates increase their monthly payments.",
                "Our independent installers are small businesses that may lack the capital to weather a slowdown in solar permitting.",
                "Utilities in several states have proposed fixed grid connection charges that would lengthen the payback period of rooftop solar.",
                "Permitting and interconnection delays at local utilities can postpone solar installations and defer our revenue.",
                "Competition from lower priced solar panel manufacturers has pressured the selling prices of our residential systems.",
                "Declines in retail electricity prices would reduce the savings homeowners expect from installing solar panels.",
                "Installer training and certification requirements vary by state, which complicates the expansion of our installer network.",
                "Battery storage attach rates depend on utility rate structures that reward homeowners for shifting solar output to evening hours.",
            ],
            events: &[
                (
                    "On {date}, the public utility commission adopted the {name} tariff, which lowered export credits for new rooftop solar customers.",
                    "Since the {name} tariff took effect on {date}, installers in that state have reported fewer signed solar contracts.",
                ),
                (
                    "On {date}, the {name} installer group, one of our largest channel partners, filed for bankruptcy protection.",
                    "The {name} installer bankruptcy filed on {date} left several hundred solar projects without a servicing partner.",
                ),
            ],
            focus: &["inverters", "batteries", "panels", "racking", "optimizers", "chargers", "monitoring", "microgrids", "leasing", "trackers", "wiring", "transformers"],
        },
        market: &[
            "Our solar installer financing partners are sensitive to changes in interest rates, which affect the cost of homeowner loans.",
            "We purchase polysilicon and inverter components under contracts priced in foreign currencies.",
            "A ten percent increase in module component prices would reduce our gross margin on residential solar systems.",
        ],
    },
    FirmText {
        business: "We design consumer electronic devices, including tablets, headphones and smart displays, and sell them through retailers and our online store.",
        theme: Theme {
            sentences: &[
                "A substantial portion of our device sales occurs during the holiday shopping season, so weak holiday demand would disproportionately affect our annual results.",
                "Our devices compete with products from much larger consumer electronics companies that have greater marketing budgets.",
                "Product launches require accurate demand forecasts, and excess device inventory may need to be sold at steep discounts.",
                "Large retail partners account for a significant share of our device sales and may reduce shelf space for our products.",
                "Warranty claims and product returns for our headphones and tablets could exceed the reserves we have established.",
                "Consumer preferences for device features change quickly, and our new products may not achieve market acceptance.",
                "Retailers may demand price protection and promotional allowances that reduce the margins on our devices.",
                "Negative product reviews or reports of battery defects could damage our brand and reduce device sales.",
                "Our online store depends on third party payment and fulfillment services that could experience outages during peak shopping periods.",
                "Shorter product life cycles require us to launch new devices every year, which increases development and marketing costs.",
            ],
            events: &[
                (
                    "On {date}, we recalled the {name} headphone line after reports of overheating batteries.",
                    "Costs associated with the {name} headphone recall announced on {date} increased our warranty expense for the year.",
                ),
                (
                    "On {date}, our largest retail partner informed us that it would remove the {name} tablet from its stores.",
                    "After losing retail placement for the {name} tablet on {date}, we reduced production and wrote down device inventory.",
                ),
            ],
            focus: &["tablets", "headphones", "speakers", "displays", "wearables", "accessories", "cameras", "keyboards", "subscriptions", "routers", "adapters", "controllers"],
        },
        market: &[
            "Our retail partners pay us in local currencies, so a stronger dollar reduces the reported value of international device sales.",
            "We manage device inventory levels to limit exposure to price declines in consumer electronics components.",
            "Memory and display component prices fluctuate, and a ten percent increase would reduce our device margins.",
        ],
    },
    FirmText {
        business: "We are a bank holding company that provides commercial lending, deposit and treasury management services to businesses and consumers.",
        theme: Theme {
            sentences: &[
                "Our allowance for credit losses may be insufficient to absorb actual loan losses if borrower conditions deteriorate.",
                "We have a significant concentration of commercial real estate loans, and declining property values could impair collateral coverage.",
                "Rapid deposit outflows could force us to sell securities at a loss or to rely on more expensive wholesale funding.",
                "Changes in interest rates affect our net interest margin because loans and deposits reprice at different speeds.",
                "Bank regulators may require us to hold additional capital, which could limit dividends and share repurchases.",
                "Uninsured deposits represent a meaningful share of our funding base and may be withdrawn quickly during periods of stress.",
                "Borrowers in the office and retail property segments may be unable to refinance maturing loans at current rates.",
                "Unrealized losses on our securities portfolio reduce tangible capital and could constrain our liquidity options.",
                "Competition for deposits from online banks and money market funds increases our funding costs.",
                "Failures of other regional banks could undermine depositor confidence in our bank even without any change in our own condition.",
            ],
            events: &[
                (
                    "On {date}, the {name} office tower, which secures one of our largest commercial real estate loans, lost its anchor tenant.",
                    "We placed the {name} office tower loan on nonaccrual status after the tenant departure reported on {date}.",
                ),
                (
                    "On {date}, depositors withdrew an unusual volume of uninsured balances following news about the {name} bank failure.",
                    "The deposit outflows that followed the {name} bank failure on {date} led us to increase borrowings from the home loan bank.",
                ),
            ],
            focus: &["mortgages", "deposits", "treasury", "construction", "equipment", "agriculture", "wealth", "cards", "payments", "custody", "syndication", "factoring"],
        },
        market: &[
            "Interest rate risk is our primary market risk, and we measure the sensitivity of net interest income to parallel rate shocks.",
            "A two hundred basis point increase in rates would reduce the economic value of our equity under our simulation models.",
            "Our asset liability committee sets limits on the repricing gap between loans and deposits.",
        ],
    },
    FirmText {
        business: "We explore for, develop and produce crude oil and natural gas from onshore basins in the United States.",
        theme: Theme {
            sentences: &[
                "Oil and natural gas prices are volatile, and sustained low prices would reduce our revenue and the value of our reserves.",
                "Our proved reserve estimates depend on engineering assumptions that may prove inaccurate as drilling results emerge.",
                "Drilling activities are subject to operating hazards such as blowouts, well fires and equipment failures.",
                "Limited pipeline takeaway capacity in our basins could force us to sell oil and gas at wider price discounts.",
                "Regulations limiting methane emissions and flaring could increase the cost of completing and operating our wells.",
                "We may be unable to replace produced reserves if our drilling program fails to find commercial quantities of oil and gas.",
                "Our credit facility borrowing base is tied to reserve values and could be reduced after a decline in commodity prices.",
                "Shortages of drilling rigs, frac crews and water supplies could delay well completions and raise our costs.",
                "Restrictions on hydraulic fracturing in key states would limit our ability to develop undeveloped acreage.",
                "Hedging oil and gas production protects part of our cash flow but limits our benefit from rising prices.",
            ],
            events: &[
                (
                    "On {date}, a well control incident at the {name} pad halted oil production in that field.",
                    "Repairs following the {name} pad incident of {date} kept several wells offline and reduced oil and gas volumes.",
                ),
                (
                    "On {date}, the operator of the {name} gathering pipeline declared force majeure on natural gas deliveries.",
                    "The {name} pipeline force majeure declared on {date} required us to shut in gas wells and flare associated volumes.",
                ),
            ],
            focus: &["permian", "shale", "offshore", "condensate", "midstream", "gathering", "refining", "acreage", "royalties", "pipelines", "compression", "storage"],
        },
        market: &[
            "Our primary market risk is the price we receive for crude oil and natural gas production.",
            "We use swaps and collars to hedge a portion of expected oil and gas production against price declines.",
            "A ten percent decline in realized commodity prices would reduce our annual oil and gas revenue substantially.",
        ],
    },
    FirmText {
        business: "We operate acute care hospitals and outpatient surgery centers in mid sized communities across several states.",
        theme: Theme {
            sentences: &[
                "A large share of our hospital revenue comes from Medicare and Medicaid, and reductions in reimbursement rates would lower our margins.",
                "Shortages of registered nurses have forced our hospitals to rely on expensive contract labor.",
                "Shifts in payer mix toward uninsured patients increase uncompensated care at our hospitals.",
                "Commercial insurers may refuse to renew contracts with our hospitals on acceptable reimbursement terms.",
                "Our hospitals must maintain accreditation and licensure, and deficiencies found in surveys could jeopardize participation in Medicare.",
                "Declines in elective surgery volumes reduce the revenue of our outpatient surgery centers.",
                "Malpractice claims against our hospitals and physicians could exceed our professional liability reserves.",
                "Certificate of need laws may prevent us from expanding hospital capacity in growing markets.",
                "Physician recruitment and retention in smaller communities is difficult and affects admission volumes at our hospitals.",
                "Changes to state Medicaid eligibility could increase the number of uninsured patients treated at our hospitals.",
            ],
            events: &[
                (
                    "On {date}, nurses at the {name} regional hospital began a strike over staffing ratios.",
                    "Replacement staffing during the {name} hospital strike that began on {date} increased our contract labor costs.",
                ),
                (
                    "On {date}, the state survey agency cited the {name} medical center for deficiencies in its emergency department.",
                    "We implemented a corrective plan at the {name} medical center after the survey findings issued on {date}.",
                ),
            ],
            focus: &["emergency", "surgery", "cardiology", "orthopedics", "maternity", "rehabilitation", "radiology", "clinics", "ambulatory", "neurology", "pediatrics", "dialysis"],
        },
        market: &[
            "Our variable rate term loan exposes us to changes in interest rates on hospital financing.",
            "We invest excess cash from hospital operations in short term deposits with high quality institutions.",
            "A one percentage point increase in interest rates would raise our annual interest expense on hospital debt.",
        ],
    },
    FirmText {
        business: "We discover, develop and commercialize prescription medicines for oncology and rare metabolic diseases.",
        theme: Theme {
            sentences: &[
                "Clinical trials for our drug candidates may fail to demonstrate safety or efficacy, which would prevent regulatory approval.",
                "The FDA may delay or deny approval of our drug applications or require additional clinical studies.",
                "Our revenue depends heavily on one approved medicine, and generic competition after patent expiration would sharply reduce sales.",
                "Patent challenges by generic manufacturers could shorten the market exclusivity of our medicines.",
                "Manufacturing of our drug substance relies on contract manufacturers that must comply with current good manufacturing practices.",
                "Government drug pricing reforms could reduce the prices we receive for our medicines.",
                "Enrollment in our clinical trials may be slower than expected, particularly for rare disease indications.",
                "Serious adverse events observed in clinical trials could lead to clinical holds or restrictive product labeling.",
                "Payers may limit coverage of our medicines or require prior authorization, which would reduce access to our therapies.",
                "Collaboration partners control the development of some drug candidates and may deprioritize our programs.",
            ],
            events: &[
                (
                    "On {date}, the FDA placed a clinical hold on the {name} trial after a serious adverse event.",
                    "The clinical hold on the {name} trial imposed on {date} delayed our regulatory submission for that drug candidate.",
                ),
                (
                    "On {date}, a generic manufacturer filed a patent challenge against the {name} formulation of our lead medicine.",
                    "Litigation over the {name} patent challenge filed on {date} could shorten the exclusivity of our lead medicine.",
                ),
            ],
            focus: &["oncology", "biologics", "vaccines", "generics", "diagnostics", "antibodies", "enzymes", "licensing", "biosimilars", "hormones", "vectors", "peptides"],
        },
        market: &[
            "We hold our cash in money market funds and investment grade securities to preserve capital for drug development.",
            "Some clinical trial costs are denominated in euros, so currency movements affect our research expenses.",
            "A one percentage point change in interest rates would not materially affect the value of our investment portfolio.",
        ],
    },
    FirmText {
        business: "We produce packaged foods, including cereals, snacks and frozen meals, and sell them to grocery retailers and food service distributors.",
        theme: Theme {
            sentences: &[
                "Prices of wheat, corn, sugar and vegetable oils are volatile, and higher ingredient costs could reduce our food margins.",
                "A food safety incident or product recall could harm our brands and result in significant costs.",
                "A small number of grocery retailers account for a large share of our food sales and have significant bargaining power.",
                "Consumers are shifting toward private label foods, which compete with our branded cereals and snacks on price.",
                "Drought and other adverse weather in growing regions can reduce crop yields and raise ingredient prices.",
                "Packaging material costs, including cartons and plastic film, have increased and may continue to rise.",
                "Changing consumer preferences regarding sugar and processed foods could reduce demand for some of our products.",
                "Disruptions at our frozen meal plants could limit our ability to meet grocery retailer orders.",
                "Labeling regulations for nutrition and allergens require ongoing changes to our food packaging.",
                "Our hedging of grain purchases may not fully offset increases in commodity ingredient costs.",
            ],
            events: &[
                (
                    "On {date}, we recalled {name} frozen meals after detecting possible listeria contamination.",
                    "Costs of the {name} frozen meal recall announced on {date} reduced our food segment profit.",
                ),
                (
                    "On {date}, a fire damaged the {name} cereal plant, halting production of several breakfast brands.",
                    "While the {name} cereal plant was rebuilt after the fire on {date}, we shifted food production to other facilities.",
                ),
            ],
            focus: &["cereals", "snacks", "frozen", "bakery", "dairy", "beverages", "confectionery", "pasta", "condiments", "soups", "sauces", "spreads"],
        },
        market: &[
            "We use futures contracts to hedge purchases of wheat, corn and soybean oil used in our foods.",
            "A ten percent increase in grain prices would raise our annual ingredient costs for packaged foods.",
            "Our food service receivables are denominated in dollars and carry limited currency risk.",
        ],
    },
    FirmText {
        business: "We provide truckload and intermodal freight transportation services to shippers across North America.",
        theme: Theme {
            sentences: &[
                "Diesel fuel is one of our largest operating expenses, and fuel surcharges may not fully recover higher fuel prices.",
                "A shortage of qualified truck drivers has increased driver wages and left some of our tractors unseated.",
                "Freight rates in the spot market are cyclical, and excess trucking capacity could reduce our revenue per mile.",
                "Accidents involving our trucks could result in large liability claims and higher insurance premiums.",
                "Safety regulations on driver hours of service limit the productivity of our truck fleet.",
                "Rail service disruptions could delay our intermodal freight shipments and increase our costs.",
                "Efforts by drivers to unionize could increase labor costs and reduce the flexibility of our trucking operations.",
                "Prices for new tractors and trailers have risen, and the resale value of used trucks may decline.",
                "Our largest freight customers may shift shipments to competitors or to their own private truck fleets.",
                "Emissions standards for heavy trucks could raise equipment costs and reduce fuel efficiency.",
            ],
            events: &[
                (
                    "On {date}, one of our trucks was involved in a multi vehicle accident on the {name} interstate corridor.",
                    "Claims arising from the {name} corridor truck accident on {date} exceeded our self insured retention.",
                ),
                (
                    "On {date}, drivers at the {name} terminal voted to join a union.",
                    "Negotiations with drivers at the {name} terminal following the union vote on {date} raised our labor costs.",
                ),
            ],
            focus: &["truckload", "intermodal", "refrigerated", "flatbed", "brokerage", "dedicated", "warehousing", "drayage", "tankers", "logistics", "expedited", "crossdock"],
        },
        market: &[
            "Our primary market risk is the price of diesel fuel used by our truck fleet.",
            "We enter into diesel swaps to hedge a portion of expected fuel purchases for our trucks.",
            "A ten cent per gallon increase in diesel prices would raise annual fuel expense for our truck fleet.",
        ],
    },
];
