const AWS = require('aws-sdk');

const s3 = new AWS.S3();
const params = {};
params.Bucket = process.env.S3_NAME;
params.Key = 'report.csv';

exports.handler = async (event) => {
  params.Body = JSON.stringify(event.payload);
  await s3.putObject(params).promise();
  return { statusCode: 200 };
};
